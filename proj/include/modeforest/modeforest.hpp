#pragma once

// Mode-seeking toolkit: kernel density estimation, Quick Shift forests,
// cluster-tree estimation, modal regression, and the analysis / synthetic /
// verification utilities the experiments are built on.

#include "modeforest/analysis.hpp"
#include "modeforest/cluster_tree.hpp"
#include "modeforest/io.hpp"
#include "modeforest/kernels.hpp"
#include "modeforest/modal_regression.hpp"
#include "modeforest/point_set.hpp"
#include "modeforest/quickshift.hpp"
#include "modeforest/synthetic.hpp"
#include "modeforest/verify.hpp"
