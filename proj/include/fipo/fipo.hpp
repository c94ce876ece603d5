#pragma once

#include "fipo/backtest.hpp"
#include "fipo/bond.hpp"
#include "fipo/credit.hpp"
#include "fipo/csv.hpp"
#include "fipo/frontier.hpp"
#include "fipo/io.hpp"
#include "fipo/lp.hpp"
#include "fipo/optimize.hpp"
#include "fipo/rating.hpp"
#include "fipo/risk.hpp"
#include "fipo/scenario.hpp"
#include "fipo/sleeve.hpp"
