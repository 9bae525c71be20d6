#pragma once

#include "arch.hpp"
#include "feature_matrix.hpp"
#include "geometry.hpp"
#include "idest.hpp"
#include "io.hpp"
#include "lambert_w.hpp"
#include "network.hpp"
#include "ortho.hpp"
#include "parallel.hpp"
#include "pipeline.hpp"
#include "rng.hpp"
#include "synth.hpp"
#include "nasgeom/selfcheck.hpp"
