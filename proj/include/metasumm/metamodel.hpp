#pragma once

#include "metasumm/metamodel/dataset.hpp"
#include "metasumm/metamodel/mlp.hpp"
#include "metasumm/metamodel/predictor.hpp"
#include "metasumm/metamodel/reports.hpp"
#include "metasumm/metamodel/tree.hpp"
