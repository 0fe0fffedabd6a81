#pragma once

#include "hsplab/error.hpp"
#include "hsplab/bits.hpp"
#include "hsplab/rng.hpp"
#include "hsplab/group.hpp"
#include "hsplab/backends.hpp"
#include "hsplab/group_spec.hpp"
#include "hsplab/oracle.hpp"
#include "hsplab/linalg.hpp"
#include "hsplab/abelian.hpp"
#include "hsplab/sampler.hpp"
#include "hsplab/membership.hpp"
#include "hsplab/normal_hsp.hpp"
#include "hsplab/budget.hpp"
#include "hsplab/solvers.hpp"
#include "hsplab/verify.hpp"
