#pragma once

#include "feti_lab/assembly.hpp"
#include "feti_lab/counterexample.hpp"
#include "feti_lab/error.hpp"
#include "feti_lab/mesh.hpp"
#include "feti_lab/parallel.hpp"
#include "feti_lab/spectra.hpp"
#include "feti_lab/substructuring.hpp"
