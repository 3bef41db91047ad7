#pragma once

#include "adiabatic.hpp"
#include "classical.hpp"
#include "datasets.hpp"
#include "encodings.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "linalg.hpp"
#include "matrix_method.hpp"
#include "nn.hpp"
#include "pauli.hpp"
#include "random.hpp"
#include "state_vector.hpp"
#include "var_polynomial.hpp"
