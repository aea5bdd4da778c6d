#pragma once

#include "sketchsql/balance.hpp"
#include "sketchsql/cli.hpp"
#include "sketchsql/dataset.hpp"
#include "sketchsql/errors.hpp"
#include "sketchsql/eval.hpp"
#include "sketchsql/experiment.hpp"
#include "sketchsql/features.hpp"
#include "sketchsql/linear.hpp"
#include "sketchsql/parser.hpp"
#include "sketchsql/report.hpp"
#include "sketchsql/rng.hpp"
#include "sketchsql/sqlexec.hpp"
#include "sketchsql/stats.hpp"
#include "sketchsql/synth.hpp"
#include "sketchsql/text.hpp"
#include "sketchsql/types.hpp"
