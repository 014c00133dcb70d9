#pragma once

#include "triage/corpus.hpp"
#include "triage/embed.hpp"
#include "triage/error.hpp"
#include "triage/eval.hpp"
#include "triage/experiment.hpp"
#include "triage/features.hpp"
#include "triage/head.hpp"
#include "triage/svm.hpp"
#include "triage/textprep.hpp"
