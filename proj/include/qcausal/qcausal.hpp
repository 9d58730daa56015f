#pragma once

#include "combinat.hpp"
#include "complex_matrix.hpp"
#include "discrimination.hpp"
#include "format.hpp"
#include "formulas.hpp"
#include "hermitian_eig.hpp"
#include "linalg.hpp"
#include "quantum.hpp"
#include "rational.hpp"
#include "rng.hpp"
#include "strategies.hpp"
#include "verification.hpp"
