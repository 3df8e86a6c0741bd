#pragma once

#include "symconj/analysis.hpp"
#include "symconj/benchmarks.hpp"
#include "symconj/coefficients.hpp"
#include "symconj/dense.hpp"
#include "symconj/engine.hpp"
#include "symconj/executor.hpp"
#include "symconj/fft.hpp"
#include "symconj/kepler.hpp"
#include "symconj/parabolic.hpp"
#include "symconj/records_io.hpp"
#include "symconj/table_io.hpp"
#include "symconj/verify.hpp"
