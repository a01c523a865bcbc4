#pragma once

#include "solarcast/arima.hpp"
#include "solarcast/data_model.hpp"
#include "solarcast/imputation.hpp"
#include "solarcast/metrics.hpp"
#include "solarcast/nelder_mead.hpp"
#include "solarcast/neural.hpp"
#include "solarcast/pipeline.hpp"
#include "solarcast/quality_control.hpp"
#include "solarcast/report_io.hpp"
#include "solarcast/solar_geometry.hpp"
#include "solarcast/synthetic.hpp"
