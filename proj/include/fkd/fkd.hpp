#pragma once

#include "fkd/bessel.hpp"
#include "fkd/eigen_deficit.hpp"
#include "fkd/eigensolver2d.hpp"
#include "fkd/errors.hpp"
#include "fkd/harness.hpp"
#include "fkd/perturbation.hpp"
#include "fkd/quadrature.hpp"
#include "fkd/spectral_constants.hpp"
