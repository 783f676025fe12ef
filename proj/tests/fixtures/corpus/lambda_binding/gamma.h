#ifndef GAMMA_H
#define GAMMA_H

int twice(int v);

#endif
