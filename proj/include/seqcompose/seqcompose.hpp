#pragma once

#include "seqcompose/core.hpp"
#include "seqcompose/dataset.hpp"
#include "seqcompose/error.hpp"
#include "seqcompose/eval.hpp"
#include "seqcompose/miners.hpp"
#include "seqcompose/multilevel.hpp"
#include "seqcompose/workload.hpp"
