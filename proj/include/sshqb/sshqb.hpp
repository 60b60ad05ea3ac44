#pragma once

#include "sshqb/hilbert.hpp"
#include "sshqb/model.hpp"
#include "sshqb/spectral.hpp"
#include "sshqb/observables.hpp"
#include "sshqb/dynamics.hpp"
#include "sshqb/sweeps.hpp"
