#pragma once

#include "metasumm/pipeline/artifacts.hpp"
#include "metasumm/pipeline/corpus.hpp"
#include "metasumm/pipeline/mock_server.hpp"
#include "metasumm/pipeline/stages.hpp"
