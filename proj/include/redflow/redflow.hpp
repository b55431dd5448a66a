#pragma once

// Umbrella header for the whole toolkit.

#include "redflow/archive.hpp"
#include "redflow/catalog.hpp"
#include "redflow/conformance.hpp"
#include "redflow/diag.hpp"
#include "redflow/html.hpp"
#include "redflow/js/ast.hpp"
#include "redflow/js/lexer.hpp"
#include "redflow/js/parser.hpp"
#include "redflow/package.hpp"
#include "redflow/pipeline.hpp"
#include "redflow/report.hpp"
#include "redflow/risk.hpp"
#include "redflow/spec_parser.hpp"
#include "redflow/taint.hpp"
#include "redflow/ts_strip.hpp"
