#pragma once

#include "error.hpp"
#include "parallel.hpp"
#include "series.hpp"
#include "series_bendings.hpp"
#include "fourier.hpp"
#include "polar.hpp"
#include "poly2.hpp"
#include "surface.hpp"
#include "bending.hpp"
#include "asymptotic.hpp"
#include "floquet.hpp"
#include "spectrum.hpp"
#include "homogeneous_bending.hpp"
#include "certificate.hpp"
#include "schema.hpp"
#include "io.hpp"
