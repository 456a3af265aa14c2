#pragma once

#include "prettymodel/errors.hpp"
#include "prettymodel/linalg.hpp"
#include "prettymodel/graded.hpp"
#include "prettymodel/cdga.hpp"
#include "prettymodel/dgmodule.hpp"
#include "prettymodel/pdual.hpp"
#include "prettymodel/report.hpp"
#include "prettymodel/pretty.hpp"
#include "prettymodel/bundle.hpp"
#include "prettymodel/document.hpp"
