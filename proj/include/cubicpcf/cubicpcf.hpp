#pragma once

#include "bivar_poly.hpp"
#include "boettcher.hpp"
#include "curve.hpp"
#include "dynamics.hpp"
#include "equidist.hpp"
#include "errors.hpp"
#include "heights.hpp"
#include "laurent.hpp"
#include "parse.hpp"
#include "rational.hpp"
#include "roots.hpp"
#include "special_curves.hpp"
#include "upoly.hpp"
