#pragma once

#include "stereo_follow/appearance.hpp"
#include "stereo_follow/control.hpp"
#include "stereo_follow/detection.hpp"
#include "stereo_follow/errors.hpp"
#include "stereo_follow/keypoint_log.hpp"
#include "stereo_follow/pipeline.hpp"
#include "stereo_follow/scenario.hpp"
#include "stereo_follow/sim.hpp"
#include "stereo_follow/simulation.hpp"
#include "stereo_follow/stereo_geometry.hpp"
#include "stereo_follow/template_io.hpp"
#include "stereo_follow/trace.hpp"
#include "stereo_follow/tracker.hpp"
