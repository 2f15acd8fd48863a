#pragma once

#include "dwqfi/classical_phase_space.hpp"
#include "dwqfi/qfi.hpp"
#include "dwqfi/quantum_dynamics.hpp"
#include "dwqfi/spin_algebra.hpp"
