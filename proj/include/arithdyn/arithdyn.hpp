#pragma once

#include "exact.hpp"
#include "poly.hpp"
#include "heights.hpp"
#include "projmaps.hpp"
#include "matrix_spectral.hpp"
#include "monomial.hpp"
#include "height_sequence.hpp"
#include "degrees.hpp"
