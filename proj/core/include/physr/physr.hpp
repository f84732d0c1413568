#pragma once

#include "physr/bench.hpp"
#include "physr/bundle.hpp"
#include "physr/densify.hpp"
#include "physr/errors.hpp"
#include "physr/fusion.hpp"
#include "physr/geometry.hpp"
#include "physr/grounding.hpp"
#include "physr/integrate.hpp"
#include "physr/log.hpp"
#include "physr/materials.hpp"
#include "physr/metrics.hpp"
#include "physr/parallel.hpp"
#include "physr/pipeline.hpp"
#include "physr/ply.hpp"
#include "physr/png_io.hpp"
#include "physr/providers.hpp"
#include "physr/report.hpp"
#include "physr/sampling.hpp"
#include "physr/spatial_index.hpp"
#include "physr/synth.hpp"
#include "physr/tensor_io.hpp"
#include "physr/view_select.hpp"
