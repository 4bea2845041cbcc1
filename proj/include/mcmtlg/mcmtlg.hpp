#pragma once

#include "device.hpp"
#include "errors.hpp"
#include "exact.hpp"
#include "gate.hpp"
#include "netlist.hpp"
#include "simplex.hpp"
#include "synth.hpp"
#include "transient.hpp"
