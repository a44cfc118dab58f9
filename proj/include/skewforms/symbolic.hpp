#pragma once

#include "skewforms/differentiate.hpp"
#include "skewforms/evaluate.hpp"
#include "skewforms/expr.hpp"
#include "skewforms/parse.hpp"
#include "skewforms/print.hpp"
#include "skewforms/simplify.hpp"
#include "skewforms/zero_test.hpp"
