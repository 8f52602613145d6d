#pragma once

#include "qml/errors.hpp"
#include "qml/linalg.hpp"
#include "qml/quad.hpp"
#include "qml/channels.hpp"
#include "qml/entropy.hpp"
#include "qml/traceineq.hpp"
#include "qml/pinching.hpp"
#include "qml/recovery.hpp"
#include "qml/constructions.hpp"
#include "qml/generators.hpp"
#include "qml/io.hpp"
#include "qml/fuzz.hpp"
