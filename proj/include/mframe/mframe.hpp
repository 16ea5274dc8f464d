#pragma once

#include "mframe/error.hpp"
#include "mframe/linalg.hpp"
#include "mframe/cstar.hpp"
#include "mframe/hmodule.hpp"
#include "mframe/modop.hpp"
#include "mframe/random.hpp"
#include "mframe/frames.hpp"
#include "mframe/dilation.hpp"
#include "mframe/disjoint.hpp"
#include "mframe/decomp.hpp"
#include "mframe/wavelet.hpp"
#include "mframe/fixtures.hpp"
