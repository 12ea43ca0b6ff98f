#pragma once

#include "complex.hpp"
#include "cup.hpp"
#include "eigensolver.hpp"
#include "exact.hpp"
#include "formality.hpp"
#include "hodge.hpp"
#include "homology.hpp"
#include "io.hpp"
#include "obstruction.hpp"
#include "random.hpp"
#include "zoo.hpp"
