#include "ge_dbs.h"
#include <stdio.h>
int main(void){ GedbsDataset*d=0; if(gedbs_dataset_generate("parity5",0,&d)!=GEDBS_STATUS_OK) return 1; GedbsPlan*p=0; gedbs_dbs_select(d,50,0,&p); size_t n=0,k=0; gedbs_plan_shape(p,&n,&k); printf("%zu %zu\n",n,k); gedbs_plan_free(p); gedbs_dataset_free(d); return 0;}
