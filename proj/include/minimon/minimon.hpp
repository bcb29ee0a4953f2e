#pragma once

#include "minimon/bench_runner.hpp"
#include "minimon/benchmark_config.hpp"
#include "minimon/clock.hpp"
#include "minimon/commands.hpp"
#include "minimon/kinds.hpp"
#include "minimon/pipeline.hpp"
#include "minimon/probes.hpp"
#include "minimon/queues.hpp"
#include "minimon/record.hpp"
#include "minimon/report.hpp"
#include "minimon/stats.hpp"
#include "minimon/trace_registry.hpp"
#include "minimon/workload.hpp"
