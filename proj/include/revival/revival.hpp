#pragma once

#include "bass.hpp"
#include "curation.hpp"
#include "day.hpp"
#include "error.hpp"
#include "fuzzy.hpp"
#include "granger.hpp"
#include "ingest.hpp"
#include "numerics/matrix.hpp"
#include "numerics/nls.hpp"
#include "numerics/ols.hpp"
#include "numerics/special.hpp"
#include "pipeline.hpp"
#include "record.hpp"
#include "report.hpp"
#include "series.hpp"
