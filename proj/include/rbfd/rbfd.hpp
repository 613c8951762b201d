#pragma once

#include "rbfd/analysis.hpp"
#include "rbfd/datagen.hpp"
#include "rbfd/errors.hpp"
#include "rbfd/experiments.hpp"
#include "rbfd/io.hpp"
#include "rbfd/loss.hpp"
#include "rbfd/matrix.hpp"
#include "rbfd/model.hpp"
#include "rbfd/optimizer.hpp"
#include "rbfd/random.hpp"
#include "rbfd/svd.hpp"
