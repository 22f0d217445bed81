#pragma once

#include "iffm/classify.hpp"
#include "iffm/commands.hpp"
#include "iffm/config.hpp"
#include "iffm/errors.hpp"
#include "iffm/integrator.hpp"
#include "iffm/linsys.hpp"
#include "iffm/motifs.hpp"
#include "iffm/oracle.hpp"
#include "iffm/quadrature.hpp"
#include "iffm/report.hpp"
#include "iffm/response.hpp"
