#pragma once

#include "lce/linalg.hpp"
#include "lce/field_model.hpp"
#include "lce/philox.hpp"
#include "lce/sde_engine.hpp"
#include "lce/fourier.hpp"
#include "lce/spectral.hpp"
#include "lce/analysis.hpp"
#include "lce/io.hpp"
#include "lce/svg.hpp"
#include "lce/verify.hpp"
