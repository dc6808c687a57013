#pragma once

#include <kronfilter/core.hpp>
#include <kronfilter/tensor_ops.hpp>
#include <kronfilter/golden_section.hpp>
#include <kronfilter/ridge.hpp>
#include <kronfilter/als.hpp>
#include <kronfilter/alo.hpp>
#include <kronfilter/metrics.hpp>
#include <kronfilter/signals.hpp>
#include <kronfilter/experiment.hpp>
