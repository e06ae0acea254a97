#pragma once

#include "motifcascade/error.hpp"
#include "motifcascade/text.hpp"
#include "motifcascade/graph.hpp"
#include "motifcascade/centrality.hpp"
#include "motifcascade/cascade.hpp"
#include "motifcascade/temporal.hpp"
#include "motifcascade/motif.hpp"
#include "motifcascade/exposure.hpp"
#include "motifcascade/parallel.hpp"
#include "motifcascade/survival.hpp"
#include "motifcascade/trainer.hpp"
#include "motifcascade/infer.hpp"
#include "motifcascade/synth.hpp"
#include "motifcascade/checkpoint.hpp"
#include "motifcascade/experiment.hpp"
