#pragma once

#include "metasumm/doc2vec/io.hpp"
#include "metasumm/doc2vec/model.hpp"
#include "metasumm/doc2vec/objective.hpp"
