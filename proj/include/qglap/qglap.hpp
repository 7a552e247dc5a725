#pragma once

#include <qglap/boundary.hpp>
#include <qglap/discretize.hpp>
#include <qglap/forms.hpp>
#include <qglap/generators.hpp>
#include <qglap/graph.hpp>
#include <qglap/io.hpp>
#include <qglap/numeric.hpp>
#include <qglap/witness.hpp>
