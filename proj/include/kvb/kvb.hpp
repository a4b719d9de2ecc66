#pragma once

#include "kvb/spectral/field.hpp"
#include "kvb/spectral/grid.hpp"
#include "kvb/spectral/operators.hpp"
#include "kvb/spectral/symbols.hpp"

#include "kvb/solver/etd.hpp"
#include "kvb/solver/model.hpp"
#include "kvb/solver/picard.hpp"
#include "kvb/solver/simulation.hpp"
#include "kvb/solver/xs_norm.hpp"

#include "kvb/cascade/cascade.hpp"
#include "kvb/cascade/certificate.hpp"
#include "kvb/cascade/constants.hpp"
#include "kvb/cascade/minorant.hpp"
#include "kvb/cascade/piecewise_polynomial.hpp"
#include "kvb/cascade/series.hpp"

#include "kvb/harness/config.hpp"
#include "kvb/harness/csv.hpp"
#include "kvb/harness/run.hpp"
#include "kvb/harness/svg_plot.hpp"
