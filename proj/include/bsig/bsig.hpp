#pragma once

#include "bsig/baseline.hpp"
#include "bsig/error.hpp"
#include "bsig/evalbench.hpp"
#include "bsig/graph.hpp"
#include "bsig/hashing.hpp"
#include "bsig/oracle.hpp"
#include "bsig/recovery.hpp"
#include "bsig/signature.hpp"
#include "bsig/signature_io.hpp"
