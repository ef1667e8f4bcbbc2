#pragma once

#include <rgclh/check.hpp>
#include <rgclh/clh.hpp>
#include <rgclh/command.hpp>
#include <rgclh/explorer.hpp>
#include <rgclh/expr.hpp>
#include <rgclh/quintuple.hpp>
#include <rgclh/report.hpp>
#include <rgclh/rg.hpp>
#include <rgclh/universe.hpp>
#include <rgclh/universe_json.hpp>
#include <rgclh/wmm.hpp>
