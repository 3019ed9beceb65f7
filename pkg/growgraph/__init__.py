# growgraph: growing random graphs and their graphon limits
