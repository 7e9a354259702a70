#pragma once

#include "scatterkit/classify.hpp"
#include "scatterkit/deform.hpp"
#include "scatterkit/errors.hpp"
#include "scatterkit/features.hpp"
#include "scatterkit/fft.hpp"
#include "scatterkit/filterbank.hpp"
#include "scatterkit/grid.hpp"
#include "scatterkit/inverse.hpp"
#include "scatterkit/io.hpp"
#include "scatterkit/kernel.hpp"
#include "scatterkit/moments.hpp"
#include "scatterkit/parallel.hpp"
#include "scatterkit/random.hpp"
#include "scatterkit/scattering.hpp"
#include "scatterkit/signal.hpp"
#include "scatterkit/spectral.hpp"
#include "scatterkit/version.hpp"
#include "scatterkit/wavelet.hpp"
