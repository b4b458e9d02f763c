#pragma once

#include "supertrees/asymptotics.hpp"
#include "supertrees/bgw.hpp"
#include "supertrees/bignum.hpp"
#include "supertrees/distance_sample.hpp"
#include "supertrees/error.hpp"
#include "supertrees/exact_choice.hpp"
#include "supertrees/gibbs.hpp"
#include "supertrees/kemp_sampler.hpp"
#include "supertrees/limitspace.hpp"
#include "supertrees/pd.hpp"
#include "supertrees/random.hpp"
#include "supertrees/series.hpp"
#include "supertrees/stable.hpp"
#include "supertrees/stats.hpp"
#include "supertrees/tree.hpp"
#include "supertrees/tree_stats.hpp"
