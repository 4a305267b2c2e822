#pragma once

// Umbrella header: the whole library except the CLI driver (which pulls in
// the vendored argument parser; include fuselab/cli.hpp separately).

#include "fuselab/algebra.hpp"
#include "fuselab/amenability.hpp"
#include "fuselab/catalog.hpp"
#include "fuselab/certificate.hpp"
#include "fuselab/element.hpp"
#include "fuselab/errors.hpp"
#include "fuselab/gamma.hpp"
#include "fuselab/label.hpp"
#include "fuselab/module.hpp"
#include "fuselab/rational.hpp"
#include "fuselab/spectral.hpp"
#include "fuselab/specfile.hpp"
#include "fuselab/validation.hpp"
#include "fuselab/window.hpp"
