#ifndef CKERN_CKERN_HPP
#define CKERN_CKERN_HPP

#include "ckern/blockmat.hpp"
#include "ckern/error.hpp"
#include "ckern/graph.hpp"
#include "ckern/io.hpp"
#include "ckern/laplacian.hpp"
#include "ckern/lattice_kernel.hpp"
#include "ckern/random.hpp"
#include "ckern/series.hpp"
#include "ckern/smith.hpp"
#include "ckern/torus.hpp"
#include "ckern/vdm.hpp"

#endif  // CKERN_CKERN_HPP
