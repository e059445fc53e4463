#pragma once

#include "sdpsim/curve.hpp"
#include "sdpsim/domain.hpp"
#include "sdpsim/qos.hpp"
#include "sdpsim/broker.hpp"
#include "sdpsim/study.hpp"
#include "sdpsim/scenario.hpp"
#include "sdpsim/figures.hpp"
