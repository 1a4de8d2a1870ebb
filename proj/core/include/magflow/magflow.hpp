#pragma once

#include "magflow/algebra.hpp"
#include "magflow/dynamics.hpp"
#include "magflow/errors.hpp"
#include "magflow/integrals.hpp"
#include "magflow/orbit.hpp"
