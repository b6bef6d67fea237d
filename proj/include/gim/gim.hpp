#pragma once

#include "gim/core.hpp"
#include "gim/haar.hpp"
#include "gim/operators.hpp"
#include "gim/grouping.hpp"
#include "gim/gamma.hpp"
#include "gim/recovery.hpp"
#include "gim/bounds.hpp"
#include "gim/harness.hpp"
#include "gim/io.hpp"
#include "gim/config.hpp"
