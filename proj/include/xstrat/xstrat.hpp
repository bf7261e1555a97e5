#ifndef XSTRAT_XSTRAT_HPP
#define XSTRAT_XSTRAT_HPP

#include "baselines.hpp"
#include "dataset.hpp"
#include "errors.hpp"
#include "ingest.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "report.hpp"
#include "stratified.hpp"

#endif
