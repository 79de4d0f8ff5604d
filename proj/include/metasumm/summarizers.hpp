#pragma once

#include "metasumm/summarizers/abstractive_client.hpp"
#include "metasumm/summarizers/centrality.hpp"
#include "metasumm/summarizers/encoder.hpp"
#include "metasumm/summarizers/graph.hpp"
#include "metasumm/summarizers/remote_encoder.hpp"
#include "metasumm/summarizers/sumbasic.hpp"
#include "metasumm/summarizers/summarize_all.hpp"
#include "metasumm/summarizers/summarizer_id.hpp"
