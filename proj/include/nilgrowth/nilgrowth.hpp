#pragma once
// Everything at once. Individual headers can be included on their own.

#include "nilgrowth/errors.hpp"
#include "nilgrowth/rational.hpp"
#include "nilgrowth/matrix.hpp"
#include "nilgrowth/polynomial.hpp"
#include "nilgrowth/linear.hpp"
#include "nilgrowth/liealg.hpp"
#include "nilgrowth/nilgroup.hpp"
#include "nilgrowth/wordmetric.hpp"
#include "nilgrowth/cone.hpp"
#include "nilgrowth/weights.hpp"
#include "nilgrowth/descriptor.hpp"
#include "nilgrowth/cli.hpp"
