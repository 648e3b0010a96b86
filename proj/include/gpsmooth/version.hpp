#pragma once

#define GPSMOOTH_VERSION "0.1.0"
