#pragma once

#include "discordlab/correlations.hpp"
#include "discordlab/dynamics.hpp"
#include "discordlab/experiment.hpp"
#include "discordlab/io.hpp"
#include "discordlab/optim.hpp"
#include "discordlab/qmat.hpp"
#include "discordlab/states.hpp"
