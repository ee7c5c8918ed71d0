#ifndef RQDA_RQDA_HPP
#define RQDA_RQDA_HPP

// Umbrella header for the library (the CLI lives in rqda/cli.hpp).
#include "rqda/copula_qda.hpp"
#include "rqda/csv.hpp"
#include "rqda/ensemble.hpp"
#include "rqda/error.hpp"
#include "rqda/marginals.hpp"
#include "rqda/model_io.hpp"
#include "rqda/normal.hpp"
#include "rqda/projections.hpp"
#include "rqda/random.hpp"
#include "rqda/synthdata.hpp"

#endif // RQDA_RQDA_HPP
