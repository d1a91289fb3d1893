#pragma once

#include "ulyap/torus.hpp"
#include "ulyap/mat2.hpp"
#include "ulyap/projective.hpp"
#include "ulyap/transfer.hpp"
#include "ulyap/spectrum.hpp"
#include "ulyap/measure.hpp"
#include "ulyap/rng.hpp"
#include "ulyap/parallel.hpp"
#include "ulyap/cocycle.hpp"
#include "ulyap/lyapunov.hpp"
#include "ulyap/invariant_measure.hpp"
#include "ulyap/bernoulli_pi.hpp"
#include "ulyap/furstenberg.hpp"
#include "ulyap/dimer.hpp"
#include "ulyap/verify.hpp"
