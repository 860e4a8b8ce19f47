#pragma once

#include "isopair_lab/cli.hpp"
#include "isopair_lab/colligation.hpp"
#include "isopair_lab/cyclic_defect.hpp"
#include "isopair_lab/ideal.hpp"
#include "isopair_lab/isopair.hpp"
#include "isopair_lab/json_io.hpp"
#include "isopair_lab/kernel.hpp"
#include "isopair_lab/linalg.hpp"
#include "isopair_lab/parallel.hpp"
#include "isopair_lab/poly2.hpp"
#include "isopair_lab/types.hpp"
