#pragma once

#include "assemble.hpp"
#include "certificate.hpp"
#include "constraints.hpp"
#include "diffalg.hpp"
#include "linalg.hpp"
#include "oracle.hpp"
#include "pipeline.hpp"
#include "rational.hpp"
#include "reduction.hpp"
#include "sdp.hpp"
#include "targets.hpp"
